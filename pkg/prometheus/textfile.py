import logging

import prometheus_client
from django.conf import settings


log = logging.getLogger(__name__)


def dump_metrics() -> None:
    """Writes the global registry to ``GCOP_METRICS_TEXTFILE``,
    if configured, for pickup by a node exporter.

    .. important:: The use of the global registry assumes
                   one run per process.
    """
    path = settings.METRICS_TEXTFILE
    if not path:
        return
    try:
        prometheus_client.write_to_textfile(path, prometheus_client.REGISTRY)
    except OSError:
        log.exception("Failed to write metrics to %s", path)
