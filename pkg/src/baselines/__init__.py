"""Classical PCA baselines"""
