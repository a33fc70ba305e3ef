"""Agent messaging: envelopes, the in-process bus, discovery and transport."""

from .bus import (
    AliasTaken,
    InProcessBus,
    MessagingError,
    NotFound,
    RequestTimeout,
    Unresolvable,
    forbidden_pair,
)
from .discovery import (
    NAMESERVER_NICKNAME,
    DiscoveryClient,
    Nameserver,
    NameserverClient,
    NameserverServer,
    NdsClient,
    NdsStore,
)
from .envelope import (
    CONFIRM,
    INFORM,
    MESSAGE_TYPES,
    REFUSE,
    REQUEST,
    Envelope,
    PayloadError,
    validate_payload,
)

__all__ = [
    "AliasTaken",
    "CONFIRM",
    "DiscoveryClient",
    "Envelope",
    "INFORM",
    "InProcessBus",
    "MESSAGE_TYPES",
    "MessagingError",
    "NAMESERVER_NICKNAME",
    "Nameserver",
    "NameserverClient",
    "NameserverServer",
    "NdsClient",
    "NdsStore",
    "NotFound",
    "PayloadError",
    "REFUSE",
    "REQUEST",
    "RequestTimeout",
    "Unresolvable",
    "forbidden_pair",
    "validate_payload",
]
