"""Published reference grids, indexed [scheme][preset]."""

PRESET_ORDER = ["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8"]
SCHEME_ORDER = ["azure", "azure+1", "optimal", "uniform", "cp-azure", "cp-uniform"]


def _grid(rows):
    return {s: dict(zip(PRESET_ORDER, r)) for s, r in zip(SCHEME_ORDER, rows)}


ADRC = _grid([
    [3, 6, 8, 4, 12, 16, 18, 24],
    [6, 12, 16, 5, 24, 24, 24, 32],
    [5, 8, 10, 7, 14, 20, 22, 29],
    [4, 7, 9.5, 4.6, 13, 17.29, 19, 25.22],
    [3, 6, 8, 4, 12, 16, 18, 24],
    [3.5, 6.5, 9, 4.4, 12.5, 17, 18.75, 25],
])

ARC1 = _grid([
    [3.6, 6.75, 9.14, 5.71, 12.86, 18.33, 20.70, 27.43],
    [4.8, 10.13, 13.52, 4.71, 21.64, 22.18, 22.75, 30.46],
    [5, 8, 11, 7, 13, 20, 22, 29],
    [4, 7, 9.52, 4.64, 13, 17.35, 19, 25.22],
    [3, 5.63, 7.9, 5.36, 11.36, 16.8, 19.15, 25.79],
    [3.1, 5.68, 8, 4.57, 11.39, 15.98, 17.84, 24],
])

ARC2 = _grid([
    [6, 12, 16, 12.06, 24, 38.66, 47.32, 63.03],
    [6.22, 12.02, 16.04, 11.24, 24.07, 44.63, 52.54, 70.43],
    [6.27, 12.46, 16.22, 12.26, 25.17, 39.35, 47.06, 62.62],
    [6.22, 12.02, 16.01, 11.11, 24.07, 38.96, 46.18, 61.56],
    [5.47, 10.68, 14.30, 10.63, 21.82, 35.73, 43.88, 59.43],
    [5.80, 10.99, 14.37, 10.64, 22.03, 35.86, 42.98, 58.15],
])

# The summary comparison reports different two-failure costs for the CP
# schemes at (6,2,2); both figures are accepted for those cells.
ARC2_SUMMARY = {
    "cp-azure": {"P1": 5.80, "P5": 21.82},
    "cp-uniform": {"P1": 6.00, "P5": 22.03},
}

LOCAL_PORTION = _grid([
    [.36, .41, .39, .66, .45, .58, .67, .69],
    [.47, .33, .32, .83, .20, .59, .71, .71],
    [.62, .61, .62, .82, .57, .71, .78, .77],
    [.56, .53, .52, .83, .52, .70, .76, .76],
    [.67, .63, .55, .78, .58, .65, .73, .72],
    [.80, .70, .66, .83, .62, .75, .79, .78],
])

EFFECTIVE_PORTION = _grid([
    [0, 0, 0, .66, 0, .58, .67, .69],
    [0, 0, 0, .83, 0, .17, .71, .71],
    [0, 0, 0, .82, 0, .71, .78, .77],
    [0, 0, 0, .83, 0, .70, .76, .76],
    [.47, .33, .24, .78, .20, .73, .73, .72],
    [.53, .35, .27, .83, .21, .79, .79, .78],
])
