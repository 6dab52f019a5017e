"""Exact construction and verification of logarithmic rank-2 connections on an elliptic curve."""
