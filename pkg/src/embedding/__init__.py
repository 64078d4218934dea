"""Coupler-budgeted banding of Ising coupling matrices"""
