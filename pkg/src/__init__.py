"""rskyline-kit: reverse skyline engines, k-MAC evaluators and benchmark driver."""
