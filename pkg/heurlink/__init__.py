"""
Paquete principal de heurlink.
Motor de predicción de enlaces basado en la formulación unificada de heurísticas
y en la red de propagación lineal HL-GNN.
"""

__version__ = "1.0.0"
