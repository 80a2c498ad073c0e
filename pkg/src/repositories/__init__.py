"""Repository pattern implementations"""
