"""Datasets, corruption protocols and evaluation metrics"""
