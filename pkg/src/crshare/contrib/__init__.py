"""Optional contrib implementations of crshare protocols.

Modules here bring their own storage dependencies and are not part of the
core. Import them by module path; they are not re-exported from
``crshare`` itself.
"""
