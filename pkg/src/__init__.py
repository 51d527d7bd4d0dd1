# Make src directory a Python package 