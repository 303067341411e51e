"""Canonical structures of skew-symmetric pencils and odd-grade matrix polynomials."""
