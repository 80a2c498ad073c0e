"""Command-line layer: spec parsing, commands and the argument parser"""
