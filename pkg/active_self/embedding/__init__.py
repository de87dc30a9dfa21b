from .pca import N_COMPONENTS, PcaModel, pca_fit, pca_transform

__all__ = ["N_COMPONENTS", "PcaModel", "pca_fit", "pca_transform"]
