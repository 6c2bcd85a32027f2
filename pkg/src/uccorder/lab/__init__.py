"""Experiment harness: ordering ensembles, potential energy scans, plots and the command line."""
