"""Models module for data structures"""
