import numpy as np
import pytest
import skimage.data

# photo-like held-out images; color ones are converted to luma
_HELD_OUT = (
    "camera", "coins", "moon", "text", "clock",
    "cell", "brick", "astronaut", "chelsea", "coffee",
)


def _to_gray(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3:
        img = img @ np.array([0.2126, 0.7152, 0.0722])
    return img


def held_out_image(name, side=128):
    img = _to_gray(getattr(skimage.data, name)())
    y0, x0 = (img.shape[0] - side) // 2, (img.shape[1] - side) // 2
    img = img[y0:y0 + side, x0:x0 + side]
    return img / img.max()


@pytest.fixture(scope="session")
def held_out_images():
    return {name: held_out_image(name) for name in _HELD_OUT}


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
