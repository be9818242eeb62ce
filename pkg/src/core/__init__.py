"""Core module for central components"""
