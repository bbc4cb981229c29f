"""Model selection by cross-validated risk on finite classification domains."""
