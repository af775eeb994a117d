"""Panel description consumed by the renderer."""

from __future__ import annotations

from dataclasses import dataclass

PANEL_KINDS = ("scaling", "phase-heatmap", "alpha-vs-t1",
               "fisher-vs-omega", "classical-inset")

_SCALES = (None, "linear", "log")


@dataclass(frozen=True)
class FigureSpec:
    """One panel: data files in, one image file out.

    ``inputs`` are the primary data CSVs (several series for scaling
    panels, one file otherwise).  ``fits`` attaches fit.csv overlays to a
    scaling panel; ``insets`` attaches classical.csv files as an inset on
    an alpha-vs-t1 panel.  ``label_by`` names the column used to label
    multiple series; None picks the first column that actually varies.
    Scale options default per panel kind when None.
    """

    kind: str
    inputs: tuple[str, ...]
    output: str
    fits: tuple[str, ...] = ()
    insets: tuple[str, ...] = ()
    label_by: str | None = None
    x_scale: str | None = None
    y_scale: str | None = None

    def __post_init__(self):
        if self.kind not in PANEL_KINDS:
            raise ValueError(f"unknown panel kind '{self.kind}', "
                             f"expected one of {PANEL_KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        for s in (self.x_scale, self.y_scale):
            if s not in _SCALES:
                raise ValueError(f"scale must be 'linear' or 'log', got {s!r}")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        object.__setattr__(self, "fits", tuple(str(p) for p in self.fits))
        object.__setattr__(self, "insets", tuple(str(p) for p in self.insets))
        object.__setattr__(self, "output", str(self.output))
