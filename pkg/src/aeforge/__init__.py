"""aeforge: detect latent-diffusion images by their autoencoder artifacts."""

__version__ = "0.1.0"

from .autodiff import Parameter, Tensor, backward, no_grad
from .backend import BACKEND
from .image import ImageRGB8, load_ppm, save_ppm
from .models import Autoencoder, Detector

__all__ = [
    "__version__", "BACKEND",
    "Tensor", "Parameter", "backward", "no_grad",
    "ImageRGB8", "load_ppm", "save_ppm",
    "Autoencoder", "Detector",
]
