from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.image as mpimg  # noqa: E402
import numpy as np  # noqa: E402

from .models import check_density  # noqa: E402


def save_density_png(density, path: str | Path) -> Path:
    """Grayscale image of a density field, solid material in black."""
    rho = check_density(density)
    path = Path(path)
    mpimg.imsave(path, 1.0 - np.asarray(rho), cmap="gray", vmin=0.0, vmax=1.0)
    return path
