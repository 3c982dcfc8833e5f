"""Benchmark sweeps, performance profiles and the command line interface."""
