"""Launcher: python main.py [check] MODEL ..."""
from stabmc.main import main

if __name__ == "__main__":
    main()
