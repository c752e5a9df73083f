"""
Experiments reproducing the published kicked top results, one class per experiment.
"""
