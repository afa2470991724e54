"""Open-quantum-system simulations of quantum and classical correlations.

Lindblad and linearized-Gaussian engines for two three-mode converters, four
coupled qubits and a pair of HEMT-coupled oscillators, with Gaussian discord,
SNR, fidelity and spectral metrics.
"""

__version__ = "0.1.0"
