import csv

import numpy as np

from fiscalsvar.ingest import SERIES_UNITS
from fiscalsvar.series import Quarter


def synthetic_levels(start: Quarter, n: int, seed: int) -> dict[str, list]:
    """Plausible raw level series for pipeline tests; no economics implied."""
    rng = np.random.default_rng(seed)
    cpi = 100.0 * 1.005 ** np.arange(n)
    real_gdp = 100.0 * np.cumprod(
        np.concatenate([[1.0], 1.0 + 0.005 + 0.01 * rng.standard_normal(n - 1)])
    )
    gdp = real_gdp * cpi
    total = 0.45 * gdp * (1.0 + 0.01 * rng.standard_normal(n))
    subsidies = 0.05 * gdp * (1.0 + 0.02 * rng.standard_normal(n))
    vat = 0.12 * gdp * (1.0 + 0.015 * rng.standard_normal(n))
    short_rate = 4.0 + np.cumsum(0.2 * rng.standard_normal(n))
    us_gdp = 90.0 * np.cumprod(
        np.concatenate([[1.0], 1.0 + 0.005 + 0.008 * rng.standard_normal(n - 1)])
    )
    us_inflation = 0.005 + 0.003 * rng.standard_normal(n)
    us_short_rate = 3.0 + np.cumsum(0.15 * rng.standard_normal(n))
    return {
        "date": [str(start + i) for i in range(n)],
        "total_expenditure": total.tolist(),
        "subsidies": subsidies.tolist(),
        "vat": vat.tolist(),
        "gdp": gdp.tolist(),
        "cpi": cpi.tolist(),
        "short_rate": short_rate.tolist(),
        "us_gdp": us_gdp.tolist(),
        "us_inflation": us_inflation.tolist(),
        "us_short_rate": us_short_rate.tolist(),
    }


def write_country_csv(path, columns: dict[str, list], header: list[str] | None = None):
    """Write a raw country file; column order follows the canonical schema."""
    names = header or ["date"] + list(SERIES_UNITS)
    n = len(columns["date"])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for i in range(n):
            writer.writerow(
                [columns[name][i] if name in columns else "" for name in names]
            )
