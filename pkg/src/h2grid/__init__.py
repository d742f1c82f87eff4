"""h2grid: LP sizing/dispatch of grid-connected hydrogen plants with
emissions certification under market, location, marginal and average
accounting methods."""

__version__ = "0.1.0"
