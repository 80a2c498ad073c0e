"""Test package for the CM periods toolkit"""
