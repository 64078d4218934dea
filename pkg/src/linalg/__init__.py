"""Dense linear-algebra substrate"""
