"""Experiment protocols and the trial worker pool"""
