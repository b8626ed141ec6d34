"""SQLAlchemy models for stored verification runs"""
from sqlalchemy import Column, String, Integer, DateTime, JSON, ForeignKey
from sqlalchemy.sql import func
from sqlalchemy.orm import relationship
from app.database import Base
import uuid


class VerificationRun(Base):
    """One invocation of a check suite"""
    __tablename__ = "verification_runs"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    command = Column(String, nullable=False, index=True)
    prime = Column(Integer, nullable=False)
    config = Column(JSON, default=dict)
    status = Column(String, nullable=False)
    created_at = Column(DateTime(timezone=True), server_default=func.now(), index=True)

    # Relationships
    checks = relationship("CheckRecord", back_populates="run", cascade="all, delete-orphan",
                          order_by="CheckRecord.position")


class CheckRecord(Base):
    """Outcome of a single check within a run"""
    __tablename__ = "check_records"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    run_id = Column(String, ForeignKey("verification_runs.id"), nullable=False, index=True)
    position = Column(Integer, nullable=False)
    check_id = Column(String, nullable=False, index=True)
    anchor = Column(String, nullable=False)
    status = Column(String, nullable=False)
    details = Column(JSON, default=dict)

    # Relationships
    run = relationship("VerificationRun", back_populates="checks")
