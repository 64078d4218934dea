"""Ising problems and their solvers"""
