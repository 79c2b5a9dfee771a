"""Worked models: card games, GOE spectral gap, shot noise and gravitational potential."""
