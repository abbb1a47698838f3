"""Modulo core: modello, cammini, solutori e formulazioni MILP di HubLine."""
