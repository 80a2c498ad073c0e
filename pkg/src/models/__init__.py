"""Data models package"""
