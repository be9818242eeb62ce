"""
central-spin-decoherence
Fidelity, coherence and entanglement dynamics of a central spin in a spin bath
"""
