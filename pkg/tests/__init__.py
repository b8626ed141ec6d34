"""Tests for the S(3) cohomology engine"""
