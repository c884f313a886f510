"""Float formatting shared by every CSV writer."""


def fmt_float(x) -> str:
    """12 decimals, ``-0`` folded to ``0``: keeps CSV bytes stable across runs and BLAS builds."""
    v = round(float(x), 12) + 0.0
    return f"{v:.12g}"
