"""Astroidal zig-zag graphs and their exactly solvable dimer models.

Subpackage layout:

* ``geom``        -- exact rational plane geometry primitives
* ``lattice``     -- periodic bipartite graphs, strands, Newton polygons, Abel map
* ``presets``     -- bundled fundamental domains and JSON I/O
* ``azgraph``     -- finite astroidal zig-zag graphs and their boundary data
* ``kasteleyn``   -- genus-zero Kasteleyn matrices, residue calculus, inverses
* ``asymptotics`` -- astroidal domains, phase diagram, arctic curve, limit shape
* ``tropical``    -- tropical characteristic polynomial, curve, harmonic form
* ``shuffle``     -- weighted domino shuffling on Aztec diamonds
* ``cli``         -- the ``az`` command line tool
"""

__version__ = "0.1.0"
