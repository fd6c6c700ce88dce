"""Scripts package"""
