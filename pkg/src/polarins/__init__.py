"""Strapdown navigation in the Earth frame and the local-level frame near the poles."""
from .geodesy import CurvilinearPosition, EarthModel, SingularLatitude
from .strapdown import (EarthFrameState, ImuIncrements, LocalLevelState, earth_frame_step,
                        local_level_step, propagate_earth, propagate_llf)
from .trajgen import ScenarioConfig, scenario_southward, scenario_transpolar

__version__ = "0.1.0"
