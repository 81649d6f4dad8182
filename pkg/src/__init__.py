"""coherent-flow: coherent-feedback disturbance rejection for optical ring resonators."""

__version__ = "0.1.0"
