"""Bundled example data."""

from importlib import resources

from .triangle import ClaimsTriangle, PremiumVector, parse_premiums, parse_triangle

TRIANGLE_FILE = "wuthrich_merz_triangle.csv"
PREMIUM_FILE = "wuthrich_merz_premiums.csv"

#: Divisor that maps the bundled raw amounts onto the published display digits.
WUTHRICH_MERZ_DISPLAY_SCALE = 1000


def data_path(name: str):
    return resources.files(__package__).joinpath("data", name)


def load_wuthrich_merz() -> tuple[ClaimsTriangle, PremiumVector]:
    """Ten-year paid triangle and premiums (Wuthrich-Merz 2008, Tables 2.2 and 4.3)."""
    tri = parse_triangle(data_path(TRIANGLE_FILE).read_text())
    pi = parse_premiums(data_path(PREMIUM_FILE).read_text())
    return tri, pi
