"""Call-by-value PCF workbench.

Modules: ``syntax``, ``typecheck``, ``opsem`` (the language), ``truncation``
and ``finmodel`` (finite levels and tables), ``ssp`` and ``sites`` (systems
of partitions and finite concrete sites), ``vnat`` (vertical naturals),
``suites`` (acceptance property suites) and ``cli``.
"""
__version__ = "0.1.0"
