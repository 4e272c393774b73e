"""Hierarchical hyperbolicity of graphs of free and dihedral groups with cyclic edges."""
