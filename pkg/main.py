#!/usr/bin/env python3
"""
kQ8 deformation verifier entry point
Run with: uv run python main.py verify --preset example
"""

from app.main import main

if __name__ == "__main__":
    main()
