# Environments package initialization
from environments.schedules import ValueSchedule, make_block_schedule, block_contexts, schedule_from_config
from environments.auction_env import AuctionEnv
from environments.lower_bound import LowerBoundInstance, lower_bound_reveal
from environments.two_point import TwoPointPair, two_point_env
