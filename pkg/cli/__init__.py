"""Management commands wiring the apps together:
``verify``, ``curate``, ``train``, ``frontier`` and ``check_strategy``."""
