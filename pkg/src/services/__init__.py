"""Service layer implementations"""
