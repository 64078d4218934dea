"""Ising-form L1-PCA algorithms"""
