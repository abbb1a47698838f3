"""Interfaccia a riga di comando di HubLine."""
