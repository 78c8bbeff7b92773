"""tess4d: spacetime (3d+t) tessellation of moving geometries and 4D slicing."""

__version__ = "0.1.0"
