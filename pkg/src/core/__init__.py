"""Core package: error hierarchy and precision management"""
