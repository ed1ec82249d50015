# Inventory package initialization
from inventory.newsvendor import (
    InventoryEnv,
    inventory_reward,
    downward_reveal,
    expected_inventory_reward,
    newsvendor_quantile,
    order_grid,
)
from inventory.policy import InventoryMseState, InventoryMse
