"""Modulo di configurazione per HubLine."""
