"""Exact congruence counts, character and Kloosterman sums, and bound checks over F_p."""
