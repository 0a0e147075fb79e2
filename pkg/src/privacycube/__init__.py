"""PrivacyCube gateway: smart-home traffic monitoring joined with curated
privacy-policy profiles, driving a five-face virtual cube."""

from .policy import (
    AccessParty,
    CollectionCadence,
    DataTypeTag,
    DeviceProfile,
    PolicyCorpus,
    RetentionPeriod,
    RiskAnnotation,
    RiskColor,
    RoomId,
    UsagePurpose,
    classify_risk,
    load_corpus,
    lookup_profile,
    serialize_corpus,
)
from .flows import (
    CaptureFile,
    Direction,
    FlowLog,
    FlowRecord,
    LiveInterface,
    Protocol,
    attribute_flow,
    classify_endpoints,
    coalesce_stream,
    read_capture,
)
from .geo import GeoResult, GeoStore, Ip2cTable, country_to_continent, load_ip2c, resolve_country
from .notify import (
    EmitPolicy,
    Notification,
    build_notification,
    decode_notification,
    encode_notification,
)
from .cube import CubeState, TapEvent
from .sim import SimSchedule, generate, load_schedule
from .gateway import Gateway, GatewayConfig, run
from .eventlog import replay_verify

__version__ = "0.1.0"
